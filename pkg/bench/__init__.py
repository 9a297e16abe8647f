# 基准评测包：数据集读取、卡方基线与报告
