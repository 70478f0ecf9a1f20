# Cấu Hình Bộ Công Cụ LC-ATSP
"""
⚙️ Cấu hình tập trung: dung sai số học, hằng số đặt tên và các biến môi trường.

Mọi module khác đọc dung sai từ đây thay vì tự khai báo, để một lần
chỉnh `LCATSP_TOL` trong `.env` là đủ cho toàn bộ pipeline.
"""

import math
import os
from dotenv import load_dotenv

from errors import ConfigError

# Load environment variables
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{name} phải là số thực, nhận được {raw!r}")
    if not value > 0:
        raise ConfigError(f"{name} phải dương, nhận được {value}")
    return value


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} phải là số nguyên, nhận được {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} phải >= 1, nhận được {value}")
    return value


# 📏 DUNG SAI SỐ HỌC (Numerical tolerances)
EPS_FEAS = _env_float("LCATSP_TOL", 1e-7)         # dung sai khả thi của LP
EPS_OBJ = _env_float("LCATSP_OBJ_TOL", 1e-6)      # dung sai giá trị mục tiêu
ZERO_CLAMP = 1e-9                                 # giá trị nhỏ hơn coi như 0
CEIL_NUDGE = 1e-9                                 # ceil(z) = ceil(z - CEIL_NUDGE)
RELATIVE_SLACK = 1e-6                             # độ chùng tương đối khi kiểm tra bất đẳng thức

# 🔢 HẰNG SỐ THUẬT TOÁN (Algorithm constants)
LBS_SCALE = 10                                    # lb = lbs / LBS_SCALE
LIGHTNESS_TARGET = LBS_SCALE * LBS_SCALE          # 100-light theo lb
TERMINAL_FACTOR = 8                               # |T| <= 8 * x*(E1)
WALK_FACTOR = 4                                   # w(P_i) <= 4 * lbs(P_i)
WALK_INDEGREE_CAP = 4
UNWEIGHTED_LIGHTNESS = 3
SIX_LIGHT_TARGET = 6
GAP_FACTOR = 5                                    # chỉ để báo cáo: 5 * 100 = 500
FLOW_SCALE = 10 ** 12                             # dấu phẩy tĩnh cho max-flow nguyên

# 🧮 GIỚI HẠN KÍCH THƯỚC (Size caps)
ENUMERATION_MAX_N = 10
DP_MAX_N = _env_int("LCATSP_DP_MAX_N", 12)
DP_HARD_MAX_N = 16

# 🪵 LOGGING & BATCH
LOG_LEVEL = os.getenv("LCATSP_LOG_LEVEL", "INFO").upper()
BATCH_WORKERS = _env_int("LCATSP_BATCH_WORKERS", 1)

REPORT_SCHEMA_VERSION = "1.0"


def ceil_nudged(value: float) -> int:
    """⌈value⌉ với một cú đẩy nhỏ xuống dưới để 1.0000000001 vẫn cho 1."""
    return int(math.ceil(value - CEIL_NUDGE))


def clamp(value: float) -> float:
    """Kẹp các giá trị |v| < ZERO_CLAMP về 0."""
    return 0.0 if abs(value) < ZERO_CLAMP else value
