MAJOR = 0
MINOR = 3
PATCH = 0

VERSION = (MAJOR,MINOR,PATCH)
