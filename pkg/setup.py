"""Build script for the compiled kernel core.

The package installs and runs without the extension (a pure-Python twin of
every kernel is selected at import time), so a missing compiler or Cython
only costs speed, not functionality.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "affdim.backends._core",
        ["src/affdim/backends/_core.pyx"],
        # -ffp-contract=off keeps the compiled kernels bit-identical to the
        # pure-Python twin (no FMA contraction of a*b+c).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    print("Cython not available; installing with the pure-Python backend only.")

setup(ext_modules=ext_modules)
