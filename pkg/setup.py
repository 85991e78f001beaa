"""Build the optional Cython kernels.

The package works without them (pure-Python fallback), so a missing
compiler or Cython install only skips the extension.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("LAMBDACHIRP_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "lambdachirp._ckernels",
                    ["src/lambdachirp/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
