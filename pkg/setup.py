from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="morph4d",
    version="0.1.0",
    description="SRVF-based 4D facial expression synthesis and landmark-driven mesh deformation",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["morph4d", "morph4d.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        'numpy>=1.24.0',
        'scipy>=1.10.0',
        'pydantic>=2.5.0',
        'python-dotenv>=1.0.0',
        'click>=8.1.0',
        'orjson>=3.9.0',
    ],
    extras_require={
        'test': [
            'pytest>=7.3.0',
            'pytest-cov>=4.0.0',
        ],
        'dev': [
            'black>=23.0.0',
            'isort>=5.12.0',
            'mypy>=1.0.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'morph4d=morph4d.main:main',
        ],
    },
)
