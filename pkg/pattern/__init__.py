# 模式存储包
