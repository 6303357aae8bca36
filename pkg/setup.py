"""Build the optional compiled search kernel.

The package works without it (a pure-Python twin is selected at import
time), so a missing Cython toolchain only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bipspread._bnb",
                ["src/bipspread/_bnb.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
