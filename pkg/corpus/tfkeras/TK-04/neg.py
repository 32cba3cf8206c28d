import tensorflow as tf

for seed in range(3):
    model = tf.keras.Sequential()
    weights = model.get_weights()
    tf.keras.backend.clear_session()
