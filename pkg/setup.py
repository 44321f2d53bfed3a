"""Build script: compiles the optional accelerator extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed.
"""
import os

from setuptools import Extension, setup

ext_modules = []
try:
    if not os.path.exists("src/uncon/_core.pyx"):
        raise ImportError
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "uncon._core",
        sources=["src/uncon/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")
except ImportError:
    pass

setup(ext_modules=ext_modules)
