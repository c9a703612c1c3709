"""PSNR of the fixed-point codec on scikit-image test images, per arithmetic profile.

Needs scikit-image (``pip install rapidlab[demos]``).
"""

from skimage import data

from rapidlab.appbench import PROFILES, get_profile, quality_table, run_codec

q = quality_table(50)
print(f"{'image':8s}" + "".join(f"{p:>10s}" for p in PROFILES))
for name in ["camera", "moon", "coins", "text", "page", "brick", "grass", "gravel", "clock", "cell"]:
    img = getattr(data, name)()
    psnrs = [run_codec(img, q, get_profile(p))[1].psnr for p in PROFILES]
    print(f"{name:8s}" + "".join(f"{v:10.2f}" for v in psnrs))
