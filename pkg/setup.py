"""Build script: compiles the optional separated-set kernel.

The package works without the compiled extension (a pure-Python fallback is
selected at import time), so a missing/broken Cython toolchain only costs
speed, never functionality.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/slovaklab/_sepcy.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except Exception as exc:  # pragma: no cover - toolchain dependent
    print(f"slovaklab: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
