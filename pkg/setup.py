"""Build script: compiles the chord/gauge kernel extension when possible.

The extension is optional.  If Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-numpy kernels at import
time (see inrhomb.kernels).
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "inrhomb.kernels._core",
        sources=["src/inrhomb/kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize([ext], language_level="3")
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"inrhomb: skipping compiled kernels ({exc}); "
                     "pure-python fallback will be used\n")

setup(ext_modules=ext_modules)
