"""Build script for the compiled stepping kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package installs anyway and falls back to the numpy kernel at import time.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KRFLOW_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "krflow._kernels",
                    ["src/krflow/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
