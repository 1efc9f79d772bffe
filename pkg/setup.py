"""Build script for the optional compiled kernels.

The package is pure Python; the Cython extension only accelerates the hot
loops (rule scoring, rule application, transducer execution). If Cython or a
C compiler is unavailable the install falls back to the pure-Python kernels.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except (PlatformError, FileNotFoundError) as exc:
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: compiled kernels skipped ({exc}); "
              "using pure-Python fallback")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fstner/_ckernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("WARNING: Cython not available; building without compiled kernels")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
