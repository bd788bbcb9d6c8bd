"""Build script.

The compiled kernel is optional: when Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernel at import.
Set CHARP_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CHARP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "charp._kernel",
                    ["src/charp/_kernel.pyx"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
