EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_FORMAT = 3
EXIT_USAGE = 64
