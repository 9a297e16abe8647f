# 命令行包
