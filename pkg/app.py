import os
import sys

# Add root and src to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from views.cli import main

if __name__ == '__main__':
    sys.exit(main())
