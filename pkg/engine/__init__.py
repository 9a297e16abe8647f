# 算法包：强化计数、内聚度量、拆分搜索与激活动力学
