import tensorflow as tf

a = tf.ones((4, 4))
for step in range(100):
    b = tf.matmul(a, a)
    print(b.numpy())
    del b
