use evofuzz_core::corpus::{ApiTarget, Library};
use evofuzz_core::seedgen::build_prompt;

#[test]
fn tensorflow_prompt_with_signature() {
    let target = ApiTarget::new(
        Library::TensorflowLike,
        "tf.nn.conv2d",
        "tf.nn.conv2d(input, filters, strides, padding, data_format='NHWC', dilations=None, name=None)",
    )
    .unwrap();
    assert_eq!(build_prompt(&target), include_str!("golden/prompt_tf_conv2d.txt"));
}

#[test]
fn torch_prompt_without_signature() {
    let target = ApiTarget::new(Library::TorchLike, "torch.abs", "").unwrap();
    assert_eq!(build_prompt(&target), include_str!("golden/prompt_torch_abs_bare.txt"));
}
