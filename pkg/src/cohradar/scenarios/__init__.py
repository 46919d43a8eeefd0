"""Built-in scenario files, loadable by name from the command line."""
