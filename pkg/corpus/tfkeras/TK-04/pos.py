import tensorflow as tf

for seed in range(3):
    model = tf.keras.Sequential()  # expect[TK-04]
    weights = model.get_weights()
    del model
tf.keras.backend.clear_session()
