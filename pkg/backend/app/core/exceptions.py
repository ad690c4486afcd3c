"""
异常定义模块
库代码只抛出异常，由命令行入口统一记录并转换为退出码
"""


class RieszLabError(Exception):
    """工具包异常基类"""


class DyadicDomainError(RieszLabError, ValueError):
    """二进树定义域错误：根节点无父节点/切片/层、深度越界等"""


class EnumerationCapError(RieszLabError, ValueError):
    """枚举代数超过上限"""


class LengthMismatchError(RieszLabError, ValueError):
    """路径长度与粗粒化窗口不匹配"""


class EvaluationDomainError(RieszLabError, ValueError):
    """在上半空间之外求值"""


class NonDecayingInputError(RieszLabError, ValueError):
    """需要衰减输入的积分收到了不衰减的函数（如平面波）"""


class ConfigError(RieszLabError, ValueError):
    """配置错误：未知实验、参数越界、配置文件格式错误"""
