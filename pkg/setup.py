"""Build script for the optional compiled kernels.

The package is fully functional without the extension; `ecolink._kernels`
falls back to the pure-Python implementations when the compiled module is
missing. Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ecolink._kernels._ckernels",
                ["src/ecolink/_kernels/_ckernels.pyx"],
                # Contraction off: the compiled kernels must be bit-identical
                # to the pure-Python ones on every platform, FMA included.
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
