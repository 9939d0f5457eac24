#!/usr/bin/env python
# -*- coding: utf-8 -*-
from os import path
from setuptools import find_packages, setup
import quality_corruption

this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), 'r') as f:
    long_description = f.read()

setup(
    name='quality_corruption',
    version=quality_corruption.__version__,
    description='Quality-corruption measurement, attacks and defenses for spiking object detectors',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests']),
    entry_points={'console_scripts': ['quality-corruption=quality_corruption.cli:main']},
    classifiers=[
        'License :: OSI Approved :: BSD License',
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Operating System :: POSIX :: Linux',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    install_requires=['numpy', 'scipy', 'Pillow', 'PyYAML', 'tqdm']
)
