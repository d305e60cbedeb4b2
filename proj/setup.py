"""CMake-driven build of the laa_coex._core extension module."""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        ext_path.parent.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DLAA_BUILD_PYTHON=ON",
                "-DSKBUILD=ON",  # library/module only, skip test targets
                f"-DPython_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core"],
            check=True,
        )

        built = sorted(build_dir.glob("_core*.so")) + sorted(
            build_dir.glob("_core*.pyd")
        )
        if not built:
            raise RuntimeError("CMake did not produce the _core module")
        shutil.copy2(built[0], ext_path)


setup(
    ext_modules=[CMakeExtension("laa_coex._core")],
    cmdclass={"build_ext": CMakeBuild},
)
