from .app import RodHarness, argument, command
from .worker_pool import PoolManager, get_pool_manager

__title__ = 'ROD-Harness'

__all__ = ['RodHarness', 'argument', 'command', 'PoolManager',
           'get_pool_manager', '__title__']
