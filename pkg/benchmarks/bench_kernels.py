"""Compare the compiled and pure-Python kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import os
import subprocess
import sys
import timeit

from polyreg import _core_py

try:
    from polyreg import _core
except ImportError:
    _core = None

END_TO_END = (
    "import math\n"
    "from polyreg.edge_pencil import BcPair, SearchBox, find_roots\n"
    "for pair in [(0, 0), (3, 3), (0, 1), (0, 2), (0, 3)]:\n"
    "    for theta in (math.pi / 4, math.pi / 2, 1.5 * math.pi):\n"
    "        find_roots(BcPair(*pair), theta, SearchBox(0, 5, -20, 20))\n"
)


def kernel_cases(module):
    theta = 1.5 * math.pi
    return {
        "value x1000": lambda: [module.value(k % 6, theta, complex(0.3 + 0.01 * k, 1.0))
                                for k in range(1000)],
        "segment_phase": lambda: module.segment_phase(0, theta, complex(0, -20), complex(5, -20),
                                                      0.05, 0.5, 1e-9),
        "newton x100": lambda: [module.newton(0, theta, complex(0.55, 0.01), 1, 1e-14, 60)
                                for _ in range(100)],
    }


def end_to_end(pure: bool, repeat: int) -> float:
    env = dict(os.environ, POLYREG_PURE_PYTHON="1" if pure else "0")
    code = f"import timeit\nprint(min(timeit.repeat({END_TO_END!r}, number=1, repeat={repeat})))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _core is None:
        print("compiled core not built; only the Python kernels are available")
    print(f"{'case':<22}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    py_cases = kernel_cases(_core_py)
    cy_cases = kernel_cases(_core) if _core is not None else {}
    for name, fn in py_cases.items():
        t_py = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        if name in cy_cases:
            t_cy = min(timeit.repeat(cy_cases[name], number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<22}{t_py:>14.3f}{t_cy:>14.3f}{t_py / t_cy:>9.1f}x")
        else:
            print(f"{name:<22}{t_py:>14.3f}{'-':>14}{'-':>10}")
    t_py = end_to_end(True, args.repeat) * 1e3
    t_cy = end_to_end(False, args.repeat) * 1e3
    print(f"{'find_roots, 15 cases':<22}{t_py:>14.1f}{t_cy:>14.1f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
