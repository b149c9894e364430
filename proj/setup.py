"""CMake-driven build of the pybind11 extension.

The extension is configured and compiled by the repository's CMake build;
this file only teaches setuptools to invoke it and to place the resulting
_core module inside the mixedfem package. Use

    pip install -e . --no-build-isolation
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)

        cfg = "Debug" if self.debug else "Release"
        configure = [
            "cmake",
            str(source_dir),
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DMIXEDFEM_PY_OUTPUT_DIR={out_dir}",
            "-DMIXEDFEM_BUILD_TESTS=OFF",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        if os.environ.get("CMAKE_GENERATOR") is None:
            try:
                subprocess.run(["ninja", "--version"], capture_output=True, check=True)
                configure.append("-GNinja")
            except (OSError, subprocess.CalledProcessError):
                pass
        subprocess.run(configure, cwd=build_dir, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "mixedfem_py", "--config", cfg],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("mixedfem._core")],
    cmdclass={"build_ext": CMakeBuild},
)
