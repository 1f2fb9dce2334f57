"""Build script: compiles the optional C kernel extension when Cython and a
C compiler are available.  The package falls back to the numpy kernels at
import time, so a failed extension build never blocks installation."""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Treat extension build failures as a warning, not an install failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler / toolchain
            warnings.warn(f"C kernel build skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"C kernel build skipped for {ext.name}: {exc}")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "terratrace.kernels._ckernels",
                ["src/terratrace/kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
