# -*- coding: utf-8 -*-
import sys
import os.path

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup

if sys.version_info < (3, 7):
    error = 'Requires Python Version 3.7 or above... exiting.'
    print(error, file=sys.stderr)
    sys.exit(1)

here = os.path.abspath(os.path.dirname(__file__))


def readme():
    with open(os.path.join(here, 'README.rst')) as f:
        return f.read()


setup(
    name='hybridnoma',
    version='1.0.0',
    description='Multi-cell NOMA handover simulator with hybrid Gold-Walsh sequences and a numpy DQN',
    long_description=readme(),
    long_description_content_type='text/x-rst',
    classifiers=[
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering'
    ],
    keywords='NOMA SIC handover Gold Walsh Kasami spreading sequence DQN prioritized replay simulator',
    license='Apache-2.0',
    packages=['hybridnoma'],
    package_data={'hybridnoma': ['presets/*.yaml']},
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'pandas>=1.5',
        'pyyaml>=5.1'],
    include_package_data=True,
    entry_points={
        'console_scripts': ['hybridnoma=hybridnoma.cli:main'],
    },
    tests_require=['pytest>=6.0',
                   'coveralls>=1.7.0',
                   'coverage>=4.5.0'],
    zip_safe=False
)
