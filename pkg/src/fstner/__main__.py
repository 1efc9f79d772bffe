from fstner.cli import entry_point

entry_point()
