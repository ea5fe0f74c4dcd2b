"""Build the compiled counting kernels.

The package works without the extension (a pure-Python backend is selected
at import time), but the Cython kernels make support counting and
subsequence scans considerably faster on large inputs.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        Extension(
            "engage_miner.kernels._ckernels",
            ["src/engage_miner/kernels/_ckernels.pyx"],
        ),
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
