pub mod labels;
pub mod layout;
pub mod production;
pub mod signature;
