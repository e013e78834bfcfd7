"""Build script for the compiled kernel core.

The solver works without the extension (a pure-Python kernel backend is
selected at import time), but the compiled core is what makes full-length
runs practical.  ``pip install -e . --no-build-isolation`` builds it.
"""

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "gnls._kernels._cy",
        ["src/gnls/_kernels/_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
