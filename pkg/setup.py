"""Build script for the optional Cython kernels.

The package is fully functional without the extension: ``tlbt._backend``
falls back to the numpy implementations in ``tlbt._fallback``.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TLBT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "tlbt._kernels",
                    ["src/tlbt/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
