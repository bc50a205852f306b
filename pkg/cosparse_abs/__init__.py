# cosparse_abs: analysis-by-synthesis recovery of cosparse signals
