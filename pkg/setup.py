"""Build script: compiles the optional simplex extension when Cython and a C
toolchain are available, otherwise installs the pure-Python package."""

import os

from setuptools import setup

_PYX = os.path.join("src", "gridrisk", "_kernels", "_fastlp.pyx")

ext_modules = []
if os.path.exists(_PYX):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gridrisk._kernels._fastlp",
                    [_PYX],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
