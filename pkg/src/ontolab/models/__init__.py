from .lewis import LewisModel as LewisModel
from .lewis import born_check as born_check
from .lewis import order_basis as order_basis
from .lewis import overlap as overlap
from .lewis import response as response
from .lewis import sample as sample
