import tensorflow as tf

op = tf.compat.v1.placeholder(tf.float32)
sess = tf.compat.v1.Session()
for i in range(100):
    total = sess.run(tf.add(op, i))  # expect[TK-09]
sess.close()
