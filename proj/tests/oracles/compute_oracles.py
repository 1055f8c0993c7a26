"""Independent reference values frozen into the C++ tests.

Uses numpy / scikit-image / PyWavelets / scipy / zlib only; nothing here
calls the C++ library. Run: python3 tests/oracles/compute_oracles.py
"""
import json
import zlib

import numpy as np
import pywt
from scipy import special, stats
from skimage.color import rgb2lab

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def noise_rgb(w, h, seed):
    """Same stream as tests/support.hpp noise_image()."""
    base = (seed * 1099511628211) & MASK
    n = w * h * 3
    vals = np.fromiter((splitmix64((base + i) & MASK) >> 56 for i in range(n)), dtype=np.uint8, count=n)
    return vals.reshape(h, w, 3)


def entropy_bits(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def subband_entropy(rgb, levels=3, bins=16):
    lab = rgb2lab(rgb.astype(np.float64) / 255.0)
    vals = []
    for ch in range(3):
        approx = lab[..., ch]
        for _ in range(levels):
            approx, (ch_h, ch_v, ch_d) = pywt.dwt2(approx, "haar")
            for band in (ch_h, ch_v, ch_d):
                counts, _ = np.histogram(band.ravel(), bins=bins)
                vals.append(entropy_bits(counts))
    return float(np.mean(vals))


def main():
    out = {}
    out["lab_red"] = rgb2lab(np.array([[[1.0, 0.0, 0.0]]]))[0, 0].tolist()
    out["lab_white"] = rgb2lab(np.array([[[1.0, 1.0, 1.0]]]))[0, 0].tolist()

    noise128 = noise_rgb(128, 128, 11)
    out["se_noise128_seed11"] = subband_entropy(noise128)

    const = np.full((256, 256, 3), 200, dtype=np.uint8)
    out["kc_const256"] = len(zlib.compress(const.tobytes(), 9))
    noise256 = noise_rgb(256, 256, 5)
    out["kc_noise256_seed5"] = len(zlib.compress(noise256.tobytes(), 9))
    out["kc_raw256"] = 256 * 256 * 3

    # Two-colour i.i.d. image: conditional entropy of a 4-neighbour's colour.
    bits = np.array([splitmix64(i + 99) & 1 for i in range(256 * 256)]).reshape(256, 256)
    pairs = np.zeros((2, 2))
    for a, b in ((bits[:, :-1], bits[:, 1:]), (bits[:-1, :], bits[1:, :])):
        for i in range(2):
            for j in range(2):
                n = np.sum((a == i) & (b == j))
                pairs[i, j] += n
                pairs[j, i] += n
    pj = pairs / pairs.sum()
    cond = pj / pj.sum(axis=1, keepdims=True)
    out["ig_binary256"] = float(-(pj * np.log2(cond)).sum())

    out["betainc"] = [[a, b, x, float(special.betainc(a, b, x))]
                      for a, b, x in [(2.0, 3.0, 0.4), (0.5, 0.5, 0.1), (10.0, 2.5, 0.9), (50.0, 0.5, 0.97)]]
    out["t_two_sided"] = [[t, df, float(2 * stats.t.sf(abs(t), df))] for t, df in [(2.0, 10), (0.5, 3), (4.2, 1770)]]
    out["f_upper"] = [[f, d1, d2, float(stats.f.sf(f, d1, d2))]
                      for f, d1, d2 in [(9.8, 6, 1770), (125.0, 3, 1773), (1.3, 4, 20), (0.2, 2, 5)]]
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
