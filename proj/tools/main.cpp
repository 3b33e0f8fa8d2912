int srmusic_main(int argc, char** argv);

int main(int argc, char** argv)
{
    return srmusic_main(argc, argv);
}
