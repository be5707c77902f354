import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ELLSTAB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("ellstab._kernels", ["src/ellstab/_kernels.pyx"], include_dirs=[np.get_include()])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
