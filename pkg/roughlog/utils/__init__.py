from . import exceptions, io, misc, parallel, results
