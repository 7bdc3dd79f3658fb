import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernels are an optional accelerator: the package falls back to
# the numpy/scipy implementations in netatlas._kernels_py when the extension
# is absent.  Set NETATLAS_SKIP_EXT=1 to install without compiling.
extensions = []
if not os.environ.get("NETATLAS_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "netatlas._kernels",
                    sources=["src/netatlas/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
