"""Time the hot filters under each available backend.

    python3 benchmarks/bench_kernels.py --size 480 640 --repeat 5
"""

import argparse
import time

import numpy as np

from revfilt import _kernels
from revfilt.filters import (
    ClaheParams,
    EdgeAwareParams,
    GuidedFilterParams,
    box_filter,
    clahe,
    edge_aware_smooth,
    gaussian_blur,
    guided_filter,
)
from revfilt.image import RgbImage


def cases(plane, rgb):
    return {
        "box r=8": lambda: box_filter(plane, 8),
        "guided r=2": lambda: guided_filter(plane, plane, GuidedFilterParams(2, 0.01)),
        "gaussian s=3": lambda: gaussian_blur(plane, 3.0),
        "edge-aware s=20": lambda: edge_aware_smooth(plane, EdgeAwareParams(20, 0.4)),
        "edge-aware rgb s=20": lambda: edge_aware_smooth(rgb, EdgeAwareParams(20, 0.4)),
        "clahe 8x8": lambda: clahe(plane, ClaheParams()),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, nargs=2, default=(480, 640), metavar=("H", "W"))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    plane = rng.random(tuple(args.size))
    rgb = RgbImage(*(rng.random(tuple(args.size)) for _ in range(3)))
    backends = _kernels.available_backends()

    results = {}
    for name in backends:
        with _kernels.use_backend(name):
            results[name] = {label: best_of(fn, args.repeat)
                             for label, fn in cases(plane, rgb).items()}

    print(f"image {args.size[0]}x{args.size[1]}, best of {args.repeat}")
    header = f"{'kernel':<22}" + "".join(f"{b:>10}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label in results[backends[0]]:
        row = f"{label:<22}" + "".join(f"{results[b][label]:>9.3f}s" for b in backends)
        if len(backends) == 2:
            row += f"{results['pure'][label] / results['native'][label]:>9.1f}x"
        print(row)
    if len(backends) == 1:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
