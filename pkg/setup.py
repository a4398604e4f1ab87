from setuptools import find_packages, setup


def read_requirements():
    with open("requirements.txt", "r") as req_file:
        return req_file.readlines()


setup(
    name="seqgrowth",
    version="0.1.0",
    packages=find_packages(),
    package_data={"seqgrowth.configs": ["scenario_configs/*.yaml"]},
    install_requires=read_requirements(),
    entry_points={
        "console_scripts": [
            "seqgrowth=seqgrowth.cli.__main__:cli",
        ],
    },
    python_requires=">=3.9",
)
