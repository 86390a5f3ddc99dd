import os

from setuptools import setup

ext_modules = []
if os.environ.get("SHADOWLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/shadowlab/_core.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except Exception:
        # The package works without the compiled core; kernels.py falls
        # back to the pure-Python implementations at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
