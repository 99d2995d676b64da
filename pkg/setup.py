import os

from setuptools import setup

ext_modules = []
if os.environ.get("WEYLDISP_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("weyldisp._ckernels", ["src/weyldisp/_ckernels.pyx"], extra_compile_args=["-O3"])],
            language_level=3,
            quiet=True,
        )
    except ImportError:
        # no Cython: the pure-Python kernels are used at import time
        ext_modules = []

setup(ext_modules=ext_modules)
