"""Build the optional compiled kernels; the package works without them."""

import ctypes.util
import os
import platform

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Skip the extension with a warning when no compiler or Cython is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback")


def _vector_math() -> bool:
    """glibc's libmvec on x86-64 Linux, unless disabled with FATKAPPA_NO_LIBMVEC=1."""
    if os.environ.get("FATKAPPA_NO_LIBMVEC"):
        return False
    if platform.system() != "Linux" or platform.machine() != "x86_64":
        return False
    return ctypes.util.find_library("mvec") is not None


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
    args = ["-O3", "-fno-math-errno"]
    libs = []
    if _vector_math():
        macros.append(("FK_USE_LIBMVEC", "1"))
        args.append("-fopenmp-simd")
        libs = ["mvec", "m"]
    ext = Extension(
        "fatkappa._kernels",
        ["src/fatkappa/_kernels.pyx"],
        include_dirs=[np.get_include(), "src/fatkappa"],
        extra_compile_args=args,
        libraries=libs,
        define_macros=macros,
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
