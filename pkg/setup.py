"""Build script for the optional compiled interpolation kernels.

The package works without the extension (a numpy fallback is selected at
import time); set FBSDELAB_PURE=1 to skip building it.  -O3 only, no
-ffast-math / -march: the compiled kernels must stay bit-identical to the
fallback so scenario outputs do not depend on the backend.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("FBSDELAB_PURE"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "fbsdelab._kernels._speedups",
                    ["src/fbsdelab/_kernels/_speedups.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
