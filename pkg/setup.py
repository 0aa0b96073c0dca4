"""Cython extension for the coordinate-ascent and Gibbs kernels.

The extension is optional: if it fails to build, the package falls back
to the pure-Python kernels in ``sparseising._kernels_py``.

In-place build for development:
    python3 setup.py build_ext --inplace
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        name="sparseising._kernels_fast",
        sources=["src/sparseising/_kernels_fast.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    ),
]

setup(
    ext_modules=cythonize(
        extensions,
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    ),
)
