from setuptools import setup

setup(
	name='pyHCT',
	version='0.3.1',
	packages=['', 'ConfigManager'],
	py_modules=['pyhct'],
	url='',
	license='LGPL',
	author='Nikki Cooper',
	author_email='nikki.lynn.cooper@gmail.com',
	description='Hierarchical cluster trees for nearest neighbour search, classification and anomaly detection',
	entry_points={'console_scripts': ['pyhct=pyhct:main']},
)
