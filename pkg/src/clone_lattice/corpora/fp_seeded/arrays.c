/* Index loops whose accesses drift one element past the guard. */

void zero_prefix(int *a, int n)
{
    int i;
    for (i = 0; i < n; i++)
        a[i] = 0;
}

void zero_shifted(int *b, int n)
{
    int i;
    for (i = 0; i < n; i++)
        b[i + 1] = 0;
}

unsigned pair_checksum(unsigned char *buf, int len)
{
    int i;
    unsigned s;
    s = 0;
    for (i = 0; i + 1 < len; i += 2)
        s = mix_word(s, buf[i], buf[i + 1]);
    return s;
}

unsigned pair_checksum_tail(unsigned char *buf, int len)
{
    int i;
    unsigned s;
    s = 0;
    for (i = 0; i < len; i += 2)
        s = mix_word(s, buf[i], buf[i + 1]);
    return s;
}
