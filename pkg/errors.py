# Các Lớp Lỗi
"""
❌ Cây ngoại lệ dùng chung cho toàn bộ bộ công cụ.

InvalidInputError dành cho đầu vào sai (file hỏng, tham số không hợp lệ);
InternalInconsistencyError dành cho các bảo đảm đã được chứng minh nhưng bị vi phạm,
tức là một lỗi phía trên trong pipeline.
"""

from typing import Any, Dict, Optional


class LcAtspError(Exception):
    """Base class cho mọi lỗi của bộ công cụ."""


class ConfigError(LcAtspError):
    """Biến môi trường không hợp lệ."""


class InvalidInputError(LcAtspError, ValueError):
    """Đầu vào không hợp lệ: file sai định dạng, lát cắt rỗng, tham số ngoài miền."""


class GraphNotStronglyConnectedError(InvalidInputError):
    """LP(G) không khả thi khi đồ thị không liên thông mạnh."""


class LpStatusError(LcAtspError):
    """LP trả về infeasible/unbounded trong khi cần một nghiệm tối ưu."""

    def __init__(self, status: str, message: str = ""):
        super().__init__(message or f"LP status: {status}")
        self.status = status


class IterationLimitError(LcAtspError):
    """Vòng lặp cắt mặt phẳng hoặc ghép tour vượt quá giới hạn."""


class ExpensiveMassTooSmallError(InvalidInputError):
    """x*(E1) < 1: hãy dùng nhánh 6-light thay cho mạng nguồn."""

    def __init__(self, expensive_mass: float):
        super().__init__(
            f"x*(E1) = {expensive_mass:.9g} < 1: dùng six_light_via_unweighted thay thế"
        )
        self.expensive_mass = expensive_mass


class InternalInconsistencyError(LcAtspError, RuntimeError):
    """Một bảo đảm đã được chứng minh bị vi phạm; kèm dữ liệu chẩn đoán."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SinkFlowViolationError(InternalInconsistencyError):
    """SinkFlow vi phạm một bất biến; `invariant` là tên bất biến."""

    def __init__(self, invariant: str, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(f"[{invariant}] {message}", diagnostics)
        self.invariant = invariant


class VerificationError(LcAtspError):
    """Kết quả không qua kiểm định: thành phần quá nặng hoặc lớp không được cắt."""

    def __init__(self, message: str, component: Optional[int] = None, partition_class: Optional[int] = None):
        super().__init__(message)
        self.component = component
        self.partition_class = partition_class


class StageError(LcAtspError):
    """Lỗi trong một giai đoạn của pipeline, giữ tên giai đoạn."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
