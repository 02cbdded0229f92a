# Tests package 
