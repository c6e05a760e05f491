"""Build script: compiles the optional spectrum kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a missing Cython toolchain only costs speed.
"""

import warnings

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "squeezecool._kernels",
                ["src/squeezecool/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    warnings.warn("Cython or NumPy not available at build time; "
                  "installing with the pure-Python spectrum kernel only")
    ext_modules = []

setup(ext_modules=ext_modules)
