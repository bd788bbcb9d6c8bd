"""Select the coefficient kernel at import time.

The compiled extension is preferred when it was built; the pure-Python
kernel is the fallback.  CHARP_KERNEL=py or CHARP_KERNEL=c forces a choice
(forcing "c" raises if the extension is missing, which beats silently
benchmarking the wrong thing).
"""

import os

_forced = os.environ.get("CHARP_KERNEL")
if _forced == "py":
    from . import _kernel_py as kernel
elif _forced == "c":
    from . import _kernel as kernel  # type: ignore[no-redef]
else:
    try:
        from . import _kernel as kernel  # type: ignore[no-redef]
    except ImportError:
        from . import _kernel_py as kernel

backend_name = kernel.BACKEND
